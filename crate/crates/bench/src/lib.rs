//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use toric_core::{evaluation_matrix, EvaluationMatrix, Field, LatticePolytope};

pub fn field(q: u64) -> Arc<Field> {
    Arc::new(Field::with_order(q).expect("benchmark fields are prime powers"))
}

pub fn square(side: i64) -> LatticePolytope {
    LatticePolytope::from_vertices(2, vec![vec![0, 0], vec![side, 0], vec![0, side], vec![side, side]])
        .expect("square is full-dimensional")
}

pub fn matrix(p: &LatticePolytope, q: u64) -> EvaluationMatrix {
    evaluation_matrix(p, &field(q)).expect("fixture fits the field")
}
