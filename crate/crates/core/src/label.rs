use std::borrow::Borrow;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

/// An element name (tag name). Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(name: impl AsRef<str>) -> Self {
        Label(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when the name is a single character, which lets words and paths
    /// be printed by plain juxtaposition.
    pub fn is_single_char(&self) -> bool {
        self.0.chars().count() == 1
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for Label {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Label {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(Arc::from(s))
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

/// Writes a label sequence by juxtaposition when every label is one character
/// long, and separated by `sep` otherwise.
pub(crate) fn write_labels<'a, I>(f: &mut fmt::Formatter<'_>, labels: I, sep: &str) -> fmt::Result
where
    I: IntoIterator<Item = &'a Label> + Clone,
{
    let compact = labels.clone().into_iter().all(Label::is_single_char);
    for (i, l) in labels.into_iter().enumerate() {
        if i > 0 && !compact {
            f.write_str(sep)?;
        }
        f.write_str(l.as_str())?;
    }
    Ok(())
}
