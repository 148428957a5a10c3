"""uqpe-match source package."""
