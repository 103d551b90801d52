"""Operating scenarios of the nexus and their evaluation."""
