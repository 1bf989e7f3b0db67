//! Formula queries: deterministic SMT-LIB serialization, solver transport,
//! replay transcripts, and model decoding.
