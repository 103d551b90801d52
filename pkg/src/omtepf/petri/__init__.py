"""Timed Petri nets: engineering system nets and operand nets."""
