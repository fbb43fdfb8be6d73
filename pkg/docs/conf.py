#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Sphinx configuration of the smdsim documentation.

import os
import sys

# document the checkout, not an installed copy
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(
    __file__))))

import smdsim  # noqa: E402

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode']

source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = ['_build']

project = u'smdsim'
author = u'Franz Woellert'
copyright = u"2017, Franz Woellert"

version = smdsim.__version__
release = smdsim.__version__

pygments_style = 'sphinx'
html_theme = 'default'
htmlhelp_basename = 'smdsimdoc'

man_pages = [
    ('index', 'smdsim', u'smdsim Documentation', [author], 1)
]
