"""Sphinx configuration for the apmlr documentation."""

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

from apmlr.__init__ import get_version

project = 'apmlr'
copyright = '2026, apmlr developers'
release = get_version()
version = '.'.join(release.split('.')[:2])

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode']
master_doc = 'index'
exclude_patterns = ['_build']

html_theme = 'default'
man_pages = [('index', 'apm', 'apmlr Documentation',
              ['apmlr developers'], 1)]
