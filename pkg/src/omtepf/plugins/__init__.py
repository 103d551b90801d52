"""Device-model plugins of the assembler."""
