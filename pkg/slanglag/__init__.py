"""slanglag: lead/lag analysis of slang terms across a dictionary and a social stream.

SPDX-License-Identifier: MIT
"""

__version__ = "0.1.0"
