//! Append-only term storage with a hard memory budget.

/// Storage width of one sequence term.
///
/// The slow-growing families hug n/2, so 32 bits cover runs of up to about
/// 2³¹ terms at half the memory; 64-bit mode exists for everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementWidth {
    W32,
    W64,
}

impl ElementWidth {
    /// Bytes one term occupies.
    pub fn bytes(self) -> usize {
        match self {
            ElementWidth::W32 => 4,
            ElementWidth::W64 => 8,
        }
    }
}

/// Why a push was refused. The history is left unchanged in either case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PushError {
    #[error("value {value} does not fit the configured element width")]
    WidthOverflow { value: i64 },
    #[error("memory budget of {budget_bytes} bytes exhausted")]
    BudgetExceeded { budget_bytes: usize },
}

#[derive(Debug, Clone)]
enum Cells {
    W32(Vec<i32>),
    W64(Vec<i64>),
}

/// The terms of one sequence, indexed from 1.
///
/// A flat array with O(1) random access — arguments like `n−A(n−j)` jump
/// arbitrarily far back, so anything slower is unusable. Capacity grows by
/// doubling but never past the byte budget fixed at construction.
#[derive(Debug, Clone)]
pub struct History {
    cells: Cells,
    budget_bytes: usize,
}

/// Capacity of the first allocation, in elements (unless the budget is
/// smaller).
const INITIAL_CAPACITY: usize = 1024;

impl History {
    /// An empty history that may grow to at most `budget_bytes` of storage.
    pub fn new(width: ElementWidth, budget_bytes: usize) -> History {
        History {
            cells: match width {
                ElementWidth::W32 => Cells::W32(Vec::new()),
                ElementWidth::W64 => Cells::W64(Vec::new()),
            },
            budget_bytes,
        }
    }

    pub fn width(&self) -> ElementWidth {
        match self.cells {
            Cells::W32(_) => ElementWidth::W32,
            Cells::W64(_) => ElementWidth::W64,
        }
    }

    pub fn budget_bytes(&self) -> usize {
        self.budget_bytes
    }

    /// Number of defined terms; the valid indices are `1..=len()`.
    pub fn len(&self) -> u64 {
        match &self.cells {
            Cells::W32(v) => v.len() as u64,
            Cells::W64(v) => v.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The term at 1-based index `n`, or `None` outside `1..=len()`.
    pub fn term(&self, n: u64) -> Option<i64> {
        if n == 0 {
            return None;
        }
        let i = (n - 1) as usize;
        match &self.cells {
            Cells::W32(v) => v.get(i).map(|&x| i64::from(x)),
            Cells::W64(v) => v.get(i).copied(),
        }
    }

    /// The term addressed by a computed argument, or `None` when the
    /// argument is out of range (including zero and negative values).
    #[inline]
    pub fn lookup(&self, argument: i64) -> Option<i64> {
        if argument < 1 {
            return None;
        }
        self.term(argument as u64)
    }

    /// Appends the term at index `len()+1`.
    #[inline]
    pub fn push(&mut self, value: i64) -> Result<(), PushError> {
        match &mut self.cells {
            Cells::W32(v) => {
                let narrow =
                    i32::try_from(value).map_err(|_| PushError::WidthOverflow { value })?;
                if v.len() == v.capacity() {
                    grow(v, self.budget_bytes)?;
                }
                v.push(narrow);
            }
            Cells::W64(v) => {
                if v.len() == v.capacity() {
                    grow(v, self.budget_bytes)?;
                }
                v.push(value);
            }
        }
        Ok(())
    }

    /// Bytes currently reserved for term storage.
    pub fn allocated_bytes(&self) -> usize {
        match &self.cells {
            Cells::W32(v) => v.capacity() * 4,
            Cells::W64(v) => v.capacity() * 8,
        }
    }

    /// All terms in index order, widened to i64.
    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        let (narrow, wide) = match &self.cells {
            Cells::W32(v) => (Some(v.iter()), None),
            Cells::W64(v) => (None, Some(v.iter())),
        };
        narrow
            .into_iter()
            .flatten()
            .map(|&x| i64::from(x))
            .chain(wide.into_iter().flatten().copied())
    }
}

/// Doubles `v`'s capacity, clamped to what `budget_bytes` allows; errors
/// when already full.
fn grow<T>(v: &mut Vec<T>, budget_bytes: usize) -> Result<(), PushError> {
    let budget_elems = budget_bytes / std::mem::size_of::<T>();
    let cap = v.capacity();
    if cap >= budget_elems {
        return Err(PushError::BudgetExceeded { budget_bytes });
    }
    let target = cap
        .saturating_mul(2)
        .max(INITIAL_CAPACITY)
        .min(budget_elems);
    v.reserve_exact(target - v.len());
    Ok(())
}
