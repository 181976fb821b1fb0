//! Book chapters as doc-tested modules.
