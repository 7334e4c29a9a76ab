"""Air traffic complexity workflow."""
