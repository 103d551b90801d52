"""Version number of the omtepf package.

DON'T TOUCH THIS FILE. The release workflow rewrites it.
"""

__version__ = "0.0.0a0"
