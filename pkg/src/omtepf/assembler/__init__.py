"""Assembly of time-expanded programs from nets, boundary data and device models."""
