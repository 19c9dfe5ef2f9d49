"""Toolkit for aperiodicity analysis on the two-dimensional integer lattice.

Modules:
  words        -- binary sequences (Thue-Morse) and their aperiodicity windows
  patterns     -- finite patterns, aperiodic pairs, acceptability, the staged
                  construction of acceptable squares
  game         -- the coin-and-bucket orientation game and its exhaustive solver
  geometry     -- exact rational jigsaw/hull machinery, safe sets and safe paths
  certificate  -- frames, boxes, witnesses, coin-bucket configurations
  gluing       -- merging two certified configurations along a region boundary
  cli          -- command line entry points
"""

__version__ = "0.1.0"
