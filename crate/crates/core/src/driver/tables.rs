use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::field::FieldResult;

/// Counts of the nonzero modules `Λ/J` of one residue class of `f mod 3`, by
/// level of stabilization `n` (rows) and `T^k` invariant (columns).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassTable {
    pub residue3: u8,
    pub cells: BTreeMap<(u32, usize), u64>,
    pub fields: u64,
    /// `C(f) = 0`.
    pub zero: u64,
    /// `J = (3, T)`.
    pub maximal: u64,
    pub unresolved: u64,
}

impl ClassTable {
    pub fn nonzero(&self) -> u64 {
        self.cells.values().sum()
    }

    pub fn get(&self, n: u32, k: usize) -> u64 {
        self.cells.get(&(n, k)).copied().unwrap_or(0)
    }

    pub fn row_totals(&self) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for (&(n, _), &c) in &self.cells {
            *out.entry(n).or_insert(0) += c;
        }
        out
    }

    pub fn column_totals(&self) -> BTreeMap<usize, u64> {
        let mut out = BTreeMap::new();
        for (&(_, k), &c) in &self.cells {
            *out.entry(k).or_insert(0) += c;
        }
        out
    }

    /// Comma-separated, one row per level, one column per `T^k`, with row and
    /// column totals.
    pub fn to_csv(&self) -> String {
        let cols: Vec<usize> = self.column_totals().keys().copied().collect();
        let col_name = |k: usize| if k == 1 { "T".to_string() } else { format!("T^{k}") };
        let mut s = String::from("n");
        for &k in &cols {
            write!(s, ",{}", col_name(k)).unwrap();
        }
        s.push_str(",total\n");
        for (n, total) in self.row_totals() {
            write!(s, "{n}").unwrap();
            for &k in &cols {
                write!(s, ",{}", self.get(n, k)).unwrap();
            }
            writeln!(s, ",{total}").unwrap();
        }
        s.push_str("total");
        for c in self.column_totals().values() {
            write!(s, ",{c}").unwrap();
        }
        writeln!(s, ",{}", self.nonzero()).unwrap();
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tables {
    /// Indexed by `f mod 3`.
    pub classes: [ClassTable; 3],
}

impl Tables {
    pub fn class(&self, residue3: u8) -> &ClassTable {
        &self.classes[residue3 as usize]
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in [0u8, 2, 1] {
            let t = self.class(r);
            writeln!(
                s,
                "# f = {r} mod 3: fields {}, C(f) = 0: {}, nonzero: {}, J = (3,T): {}, unresolved: {}",
                t.fields,
                t.zero,
                t.nonzero(),
                t.maximal,
                t.unresolved
            )
            .unwrap();
            s.push_str(&t.to_csv());
            s.push('\n');
        }
        s
    }
}

pub fn aggregate_tables<'a, I>(results: I) -> Tables
where
    I: IntoIterator<Item = &'a FieldResult>,
{
    let mut tables = Tables::default();
    for (i, t) in tables.classes.iter_mut().enumerate() {
        t.residue3 = i as u8;
    }
    for r in results {
        let t = &mut tables.classes[r.residue3 as usize];
        t.fields += 1;
        if !r.is_certified() {
            t.unresolved += 1;
            continue;
        }
        if r.is_trivial() {
            t.zero += 1;
            continue;
        }
        if r.is_maximal() {
            t.maximal += 1;
        }
        let (Some(n), Some(k)) = (r.n_stab, r.tk) else {
            t.unresolved += 1;
            continue;
        };
        *t.cells.entry((n, k)).or_insert(0) += 1;
    }
    tables
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::{compute_field, RunConfig};
    use crate::quadfield::discriminants_in;

    #[test]
    fn maximal_ideal_lands_in_row_zero_column_t() {
        let cfg = RunConfig::default();
        let r = discriminants_in(0, 2000)
            .filter(|fd| fd.residue3 != 1)
            .map(|fd| compute_field(&fd, &cfg))
            .find(FieldResult::is_maximal)
            .unwrap();
        let t = aggregate_tables([&r]);
        let class = t.class(r.residue3);
        assert_eq!(class.get(0, 1), 1);
        assert_eq!((class.maximal, class.nonzero(), class.zero), (1, 1, 0));
    }

    #[test]
    fn structural_zeros() {
        let cfg = RunConfig::default();
        let results: Vec<_> = discriminants_in(0, 1500).map(|fd| compute_field(&fd, &cfg)).collect();
        let t = aggregate_tables(&results);
        for class in &t.classes {
            assert_eq!(class.unresolved, 0);
            // ω_n ≡ T^{3^n} and ω'_n ≡ T^{3^n - 1} mod 3
            let slack = usize::from(class.residue3 == 1);
            for &(n, k) in class.cells.keys() {
                assert!(k + slack <= 3usize.pow(n), "({n}, T^{k}) in class {}", class.residue3);
            }
        }
        assert!(t.class(1).row_totals().keys().all(|&n| n >= 1));
        assert_eq!(t.class(0).get(0, 2), 0);
        let fields: u64 = t.classes.iter().map(|c| c.fields).sum();
        assert_eq!(fields as usize, results.len());
        let csv = t.class(2).to_csv();
        assert!(csv.starts_with("n,T"));
    }
}
