//! Small row-major grid helpers shared by the terrain and field modules.

/// Offsets of the 8-connected neighborhood.
pub(crate) const NEIGHBORS_8: [(i64, i64); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

#[inline]
pub(crate) fn index(cols: usize, row: usize, col: usize) -> usize {
    row * cols + col
}

#[inline]
pub(crate) fn coords(cols: usize, idx: usize) -> (usize, usize) {
    (idx / cols, idx % cols)
}

/// 8-connected neighbor indices of `idx` on a rows x cols grid.
pub(crate) fn neighbors_8(rows: usize, cols: usize, idx: usize) -> impl Iterator<Item = usize> {
    let (r, c) = coords(cols, idx);
    NEIGHBORS_8.iter().filter_map(move |&(dr, dc)| {
        let nr = r as i64 + dr;
        let nc = c as i64 + dc;
        if nr >= 0 && nc >= 0 && (nr as usize) < rows && (nc as usize) < cols {
            Some(index(cols, nr as usize, nc as usize))
        } else {
            None
        }
    })
}

/// Chebyshev (chessboard) distance between two cells.
pub(crate) fn chebyshev(a: (usize, usize), b: (usize, usize)) -> usize {
    let dr = a.0.abs_diff(b.0);
    let dc = a.1.abs_diff(b.1);
    dr.max(dc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_cell_has_three_neighbors() {
        let n: Vec<_> = neighbors_8(4, 5, 0).collect();
        assert_eq!(n, vec![1, 5, 6]);
    }

    #[test]
    fn interior_cell_has_eight_neighbors() {
        let n: Vec<_> = neighbors_8(4, 5, index(5, 2, 2)).collect();
        assert_eq!(n.len(), 8);
    }

    #[test]
    fn chebyshev_takes_the_larger_axis() {
        assert_eq!(chebyshev((3, 4), (5, 10)), 6);
        assert_eq!(chebyshev((5, 10), (3, 4)), 6);
        assert_eq!(chebyshev((2, 2), (2, 2)), 0);
    }
}
