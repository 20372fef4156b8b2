use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::Error;

/// Interned class name. Ids are dense and follow interning order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(pub u32);

impl ClassId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A node label: a finite set of classes.
pub type Label = BTreeSet<ClassId>;

/// The class universe. Open by default; once closed, resolving an unknown
/// name is an error instead of a fresh registration.
#[derive(Clone, Debug, Default)]
pub struct Classes {
    names: Vec<String>,
    index: HashMap<String, ClassId>,
    closed: bool,
}

impl Classes {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut c = Classes::new();
        for n in names {
            c.intern(n);
        }
        c
    }

    /// Registers `name` if needed, ignoring the closed flag.
    pub fn intern(&mut self, name: &str) -> ClassId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = ClassId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    /// Looks up `name`, registering it unless the universe is closed.
    pub fn resolve(&mut self, name: &str) -> Result<ClassId, Error> {
        match self.index.get(name) {
            Some(&id) => Ok(id),
            None if self.closed => Err(Error::UnknownClass(name.to_string())),
            None => Ok(self.intern(name)),
        }
    }

    pub fn get(&self, name: &str) -> Option<ClassId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: ClassId) -> &str {
        &self.names[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ClassId> {
        (0..self.names.len() as u32).map(ClassId)
    }

    pub fn close(&mut self) {
        self.closed = true;
    }

    pub fn open(&mut self) {
        self.closed = false;
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Name as it must be written in the text formats: bare when it is a
    /// plain class token, otherwise between bars.
    pub fn token(&self, id: ClassId) -> String {
        quote_class(self.name(id))
    }

    pub fn label_string(&self, label: &Label) -> String {
        let parts: Vec<String> = label.iter().map(|&c| self.token(c)).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn display_label<'a>(&'a self, label: &'a Label) -> impl fmt::Display + 'a {
        LabelDisplay {
            classes: self,
            label,
        }
    }
}

struct LabelDisplay<'a> {
    classes: &'a Classes,
    label: &'a Label,
}

impl fmt::Display for LabelDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.classes.label_string(self.label))
    }
}

pub fn is_class_start(c: char) -> bool {
    c.is_ascii_alphabetic() || matches!(c, '_' | '.' | '#' | ':' | '-')
}

pub fn is_class_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '#' | ':' | '-')
}

pub fn is_plain_class(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if is_class_start(c) => chars.all(is_class_char),
        _ => false,
    }
}

pub fn quote_class(name: &str) -> String {
    if is_plain_class(name) && !crate::lex::is_reserved(name) {
        name.to_string()
    } else {
        format!("|{}|", name.replace('\\', "\\\\").replace('|', "\\|"))
    }
}
