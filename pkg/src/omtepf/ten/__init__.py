"""Transportation-electricity nexus models."""
