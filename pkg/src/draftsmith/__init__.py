"""Interactive workbench that grows an editable object model out of a
natural-language app description, with a session service for running guided
design sessions and an analysis toolkit for the traces they leave behind."""

__version__ = "0.1.0"
