//! Exponent surveys, order tables, and the final elimination engine.
