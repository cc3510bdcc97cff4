//! Exhaustive formula enumeration for oracle-based testing.

use crate::formula::Formula;

/// Every formula over `props` (plus `true`/`false`) whose syntax tree has at
/// most `max_size` nodes, grouped by increasing size.
pub fn all_formulas(props: &[&str], max_size: usize) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new()];
    for size in 1..=max_size {
        let mut level = Vec::new();
        if size == 1 {
            level.push(Formula::True);
            level.push(Formula::False);
            level.extend(props.iter().map(|p| Formula::prop(*p)));
        } else {
            for a in &by_size[size - 1] {
                level.push(Formula::not(a.clone()));
                level.push(Formula::next(a.clone()));
                level.push(Formula::globally(a.clone()));
                level.push(Formula::finally(a.clone()));
            }
            for left in 1..size - 1 {
                let right = size - 1 - left;
                for a in &by_size[left] {
                    for b in &by_size[right] {
                        level.push(Formula::and(a.clone(), b.clone()));
                        level.push(Formula::or(a.clone(), b.clone()));
                        level.push(Formula::implies(a.clone(), b.clone()));
                        level.push(Formula::until(a.clone(), b.clone()));
                        level.push(Formula::weak_until(a.clone(), b.clone()));
                        level.push(Formula::release(a.clone(), b.clone()));
                    }
                }
            }
        }
        by_size.push(level);
    }
    by_size.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_by_size() {
        // 4 leaves; 16 unary; 4*16 + 6*16 at size three
        assert_eq!(all_formulas(&["p", "q"], 1).len(), 4);
        assert_eq!(all_formulas(&["p", "q"], 2).len(), 20);
        assert_eq!(all_formulas(&["p", "q"], 3).len(), 180);
        assert!(all_formulas(&["p", "q"], 4).iter().all(|f| f.size() <= 4));
    }
}
