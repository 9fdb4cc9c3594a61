//! Definite-assignment sets and jump bookkeeping.

/// Locals known to be assigned. `all` marks the vacuous set that holds
/// after a statement that cannot complete normally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Da {
    all: bool,
    bits: Vec<bool>,
}

impl Da {
    pub fn empty() -> Da {
        Da { all: false, bits: Vec::new() }
    }

    pub fn all() -> Da {
        Da { all: true, bits: Vec::new() }
    }

    pub fn has(&self, slot: usize) -> bool {
        self.all || self.bits.get(slot).copied().unwrap_or(false)
    }

    pub fn set(&mut self, slot: usize) {
        if self.all {
            return;
        }
        if self.bits.len() <= slot {
            self.bits.resize(slot + 1, false);
        }
        self.bits[slot] = true;
    }

    pub fn unset(&mut self, slot: usize) {
        if self.all {
            return;
        }
        if let Some(b) = self.bits.get_mut(slot) {
            *b = false;
        }
    }

    pub fn meet(&self, other: &Da) -> Da {
        if self.all {
            return other.clone();
        }
        if other.all {
            return self.clone();
        }
        let n = self.bits.len().max(other.bits.len());
        Da { all: false, bits: (0..n).map(|i| self.has(i) && other.has(i)).collect() }
    }

    pub fn join(&self, other: &Da) -> Da {
        if self.all || other.all {
            return Da::all();
        }
        let n = self.bits.len().max(other.bits.len());
        Da { all: false, bits: (0..n).map(|i| self.has(i) || other.has(i)).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Loop,
    Switch,
    Block,
}

#[derive(Debug)]
pub struct Target {
    pub label: Option<String>,
    pub kind: TargetKind,
    pub broken: bool,
    pub break_da: Da,
    pub continued: bool,
    pub continue_da: Da,
}

impl Target {
    pub fn new(label: Option<String>, kind: TargetKind) -> Target {
        Target { label, kind, broken: false, break_da: Da::all(), continued: false, continue_da: Da::all() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meet_with_vacuous_set_is_identity() {
        let mut a = Da::empty();
        a.set(2);
        assert_eq!(a.meet(&Da::all()), a);
        assert_eq!(Da::all().meet(&a), a);
    }

    #[test]
    fn meet_keeps_common_slots() {
        let mut a = Da::empty();
        a.set(0);
        a.set(1);
        let mut b = Da::empty();
        b.set(1);
        let m = a.meet(&b);
        assert!(!m.has(0));
        assert!(m.has(1));
        assert!(a.join(&b).has(0));
    }
}
