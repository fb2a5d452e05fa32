use std::sync::Arc;

use thiserror::Error;

use crate::semantics::{default_pool, FormulaBounds, Structure};
use crate::syntax::Signature;
use crate::truthval::{grid_points, Rational, TruthValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("pool constant {0} lies outside [0,1]")]
    PoolOutOfRange(Rational),
}

/// Limits shared by every bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_universe: usize,
    /// Truth values range over `(p/D, q/D)`.
    pub grid_denominator: u32,
    pub pool: Vec<Rational>,
    pub sentence_depth: usize,
    pub max_subset: usize,
    /// Number of structures a single search may examine.
    pub budget: u64,
    /// Variables available to sentence enumeration.
    pub variables: Vec<String>,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_universe: 2,
            grid_denominator: 4,
            pool: default_pool(),
            sentence_depth: 2,
            max_subset: 2,
            budget: 1_000_000,
            variables: vec!["x".into(), "y".into()],
        }
    }
}

impl SearchBounds {
    pub fn validate(&self) -> Result<(), BoundsError> {
        let positive = [
            ("max_universe", self.max_universe > 0),
            ("grid_denominator", self.grid_denominator > 0),
            ("max_subset", self.max_subset > 0),
            ("budget", self.budget > 0),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, ok)| !ok) {
            return Err(BoundsError::NotPositive(name));
        }
        match self.pool.iter().find(|r| !r.in_unit_interval()) {
            Some(r) => Err(BoundsError::PoolOutOfRange(*r)),
            None => Ok(()),
        }
    }

    pub fn formula_bounds(&self) -> FormulaBounds {
        FormulaBounds {
            depth: self.sentence_depth,
            pool: self.pool.clone(),
            variables: self.variables.clone(),
            term_depth: 1,
        }
    }
}

/// `a, b, ..., z`, then `e26, e27, ...`.
pub fn element_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("e{i}")
    }
}

#[derive(Debug, Clone, Copy)]
enum Cell {
    Pred(usize, usize),
    Func(usize, usize),
    Const(usize),
}

/// All structures of one universe size, as a mixed-radix counter over the
/// table cells. Predicates come first, then functions, then constants, each
/// table row-major; the last cell varies fastest.
#[derive(Debug, Clone)]
pub struct Layer {
    sig: Arc<Signature>,
    size: usize,
    cells: Vec<Cell>,
    radices: Vec<usize>,
    grid: Arc<Vec<TruthValue>>,
}

impl Layer {
    fn new(sig: Arc<Signature>, size: usize, grid: Arc<Vec<TruthValue>>) -> Self {
        let mut cells = Vec::new();
        let mut radices = Vec::new();
        for (p, decl) in sig.predicates().iter().enumerate() {
            for t in 0..size.pow(decl.arity as u32) {
                cells.push(Cell::Pred(p, t));
                radices.push(grid.len());
            }
        }
        for (f, decl) in sig.functions().iter().enumerate() {
            for t in 0..size.pow(decl.arity as u32) {
                cells.push(Cell::Func(f, t));
                radices.push(size);
            }
        }
        for c in 0..sig.constants().len() {
            cells.push(Cell::Const(c));
            radices.push(size);
        }
        Layer {
            sig,
            size,
            cells,
            radices,
            grid,
        }
    }

    pub fn universe_size(&self) -> usize {
        self.size
    }

    /// Number of structures, or `None` past `u64::MAX`.
    pub fn count(&self) -> Option<u64> {
        self.radices
            .iter()
            .try_fold(1u64, |acc, &r| acc.checked_mul(r as u64))
    }

    fn digits(&self, mut index: u64) -> Vec<usize> {
        let mut digits = vec![0; self.radices.len()];
        for (d, &r) in digits.iter_mut().zip(&self.radices).rev() {
            *d = (index % r as u64) as usize;
            index /= r as u64;
        }
        digits
    }

    fn apply(&self, m: &mut Structure, pos: usize, digit: usize) {
        match self.cells[pos] {
            Cell::Pred(p, t) => m.set_predicate_index(p, t, self.grid[digit]),
            Cell::Func(f, t) => m.set_function_index(f, t, digit),
            Cell::Const(c) => m.set_constant_index(c, digit),
        }
    }

    /// The structure at `index` within this layer.
    pub fn structure_at(&self, index: u64) -> Structure {
        let mut cursor = self.cursor(index);
        cursor.current().clone()
    }

    /// A position in the layer that steps forward cheaply.
    pub fn cursor(&self, index: u64) -> Cursor<'_> {
        let universe = (0..self.size).map(element_name).collect();
        let mut m = Structure::uniform(Arc::clone(&self.sig), universe).expect("size >= 1");
        let digits = self.digits(index);
        for (pos, &d) in digits.iter().enumerate() {
            self.apply(&mut m, pos, d);
        }
        Cursor {
            layer: self,
            digits,
            current: m,
        }
    }
}

pub struct Cursor<'a> {
    layer: &'a Layer,
    digits: Vec<usize>,
    current: Structure,
}

impl Cursor<'_> {
    pub fn current(&mut self) -> &Structure {
        &self.current
    }

    /// Moves to the next structure; false after the last one.
    pub fn advance(&mut self) -> bool {
        for pos in (0..self.digits.len()).rev() {
            self.digits[pos] += 1;
            if self.digits[pos] < self.layer.radices[pos] {
                self.layer.apply(&mut self.current, pos, self.digits[pos]);
                return true;
            }
            self.digits[pos] = 0;
            self.layer.apply(&mut self.current, pos, 0);
        }
        false
    }
}

/// Every grid-valued structure with at most `max_universe` elements.
#[derive(Debug, Clone)]
pub struct StructureSpace {
    layers: Vec<Layer>,
}

impl StructureSpace {
    pub fn new(sig: Arc<Signature>, bounds: &SearchBounds) -> Self {
        let grid = Arc::new(grid_points(bounds.grid_denominator));
        let layers = (1..=bounds.max_universe)
            .map(|n| Layer::new(Arc::clone(&sig), n, Arc::clone(&grid)))
            .collect();
        StructureSpace { layers }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Total number of structures, or `None` past `u64::MAX`.
    pub fn count(&self) -> Option<u64> {
        self.layers
            .iter()
            .try_fold(0u64, |acc, l| acc.checked_add(l.count()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("budget of {0} structures exceeded")]
pub struct BudgetExceeded(pub u64);

/// Lazy stream over a [`StructureSpace`]; yields one `Err` once the budget
/// is used up and stops.
pub struct StructureStream {
    space: StructureSpace,
    layer: usize,
    index: u64,
    emitted: u64,
    budget: u64,
    done: bool,
}

impl Iterator for StructureStream {
    type Item = Result<Structure, BudgetExceeded>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            let layer = self.space.layers.get(self.layer)?;
            if layer.count().is_some_and(|c| self.index >= c) {
                self.layer += 1;
                self.index = 0;
                continue;
            }
            if self.emitted == self.budget {
                self.done = true;
                return Some(Err(BudgetExceeded(self.budget)));
            }
            let m = layer.structure_at(self.index);
            self.index += 1;
            self.emitted += 1;
            return Some(Ok(m));
        }
    }
}

/// Structures in the documented order: universe size, then cells as a
/// mixed-radix number with grid values ascending.
pub fn enumerate_structures(sig: Arc<Signature>, bounds: &SearchBounds) -> StructureStream {
    StructureStream {
        space: StructureSpace::new(sig, bounds),
        layer: 0,
        index: 0,
        emitted: 0,
        budget: bounds.budget,
        done: false,
    }
}
