"""Ext over the mod-2 Steenrod algebra: minimal resolutions, connecting
maps of long exact sequences, and reconstruction of collapsed Adams pages
for the fibers of (sums of) Steenrod squares."""

__version__ = "0.1.0"
