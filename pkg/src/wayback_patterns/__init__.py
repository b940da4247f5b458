"""Access-pattern mining for web archive logs.

Parses Wayback Machine access logs, cleans and sessionizes them, labels
sessions as robot or human, and classifies each session as a Dip, Slide,
Dive, Skim, or a composite of Slides and Dives.
"""

__version__ = "0.1.0"
