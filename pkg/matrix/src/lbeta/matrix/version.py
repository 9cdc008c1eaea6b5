# coding: utf-8
# File automatically generated by setuptools_scm.
# Do not change or track in version control.
__version__ = '0.0.0'
version_tuple = (0, 0, 0)
