# -*- coding: utf-8 -*-

from datetime import datetime
import pkgutil

__path__ = pkgutil.extend_path(__path__, __name__)

__title__ = 'rabi'
__version__ = '1.0'
__author__ = 'The rabi developers'
__copyright__ = 'Copyright(C) 2026-%s The rabi developers' % datetime.today().year
