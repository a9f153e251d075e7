pub mod constraints;
pub mod dtd;
pub mod label;
pub mod oracle;
pub mod regex;
pub mod sat;
pub mod schema_graph;
pub mod xpath;
