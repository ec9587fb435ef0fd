//! Sequential / parallel execution switch and the shared frontier closure.

use std::collections::HashSet;
use std::hash::Hash;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How data-parallel inner loops are executed.
///
/// Without the `parallel` feature, [`Execution::Parallel`] silently runs the
/// sequential path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Map `op` over `items`, preserving order.
    pub fn map<T, U, F>(self, items: &[T], op: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(op).collect(),
            _ => items.iter().map(op).collect(),
        }
    }

    /// Fallible order-preserving map; the first error in input order wins.
    pub fn try_map<T, U, E, F>(self, items: &[T], op: F) -> Result<Vec<U>, E>
    where
        T: Sync,
        U: Send,
        E: Send,
        F: Fn(&T) -> Result<U, E> + Sync + Send,
    {
        self.map(items, op).into_iter().collect()
    }
}

/// The visited set outgrew its cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct CapExceeded {
    pub cap: usize,
}

/// Breadth-first closure of `seeds` under `expand`.
///
/// Level-synchronous: each frontier is expanded (in parallel when requested)
/// and the candidates are merged sequentially, so the returned set does not
/// depend on scheduling.
pub(crate) fn closure<T, F, I>(
    seeds: impl IntoIterator<Item = T>,
    expand: F,
    cap: usize,
    exec: Execution,
) -> Result<HashSet<T>, CapExceeded>
where
    T: Copy + Eq + Hash + Send + Sync,
    F: Fn(&T) -> I + Sync + Send,
    I: IntoIterator<Item = T>,
{
    let mut visited = HashSet::new();
    let mut frontier = Vec::new();
    for s in seeds {
        if visited.insert(s) {
            frontier.push(s);
        }
    }
    if visited.len() > cap {
        return Err(CapExceeded { cap });
    }
    while !frontier.is_empty() {
        let candidates: Vec<T> = match exec {
            #[cfg(feature = "parallel")]
            Execution::Parallel if frontier.len() > 64 => frontier
                .par_iter()
                .flat_map_iter(|x| expand(x).into_iter())
                .collect(),
            _ => frontier.iter().flat_map(&expand).collect(),
        };
        let mut next = Vec::new();
        for c in candidates {
            if visited.insert(c) {
                if visited.len() > cap {
                    return Err(CapExceeded { cap });
                }
                next.push(c);
            }
        }
        frontier = next;
    }
    Ok(visited)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_is_schedule_independent() {
        let step = |x: &u32| [(*x * 3) % 1009, (*x + 7) % 1009];
        let a = closure([1u32], step, usize::MAX, Execution::Sequential).unwrap();
        let b = closure([1u32], step, usize::MAX, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 1009);
    }

    #[test]
    fn closure_respects_cap() {
        let step = |x: &u64| [x + 1];
        let err = closure([0u64], step, 100, Execution::Sequential).unwrap_err();
        assert_eq!(err.cap, 100);
    }
}
