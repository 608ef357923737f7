"""
crnsim
Slot-based multi-hop cognitive radio network simulator comparing channel-selection
strategies (SURF, RD, SB, CA) on TTL-bounded data dissemination.
"""

__version__ = "1.0.0"
__author__ = "Tom Yan"
