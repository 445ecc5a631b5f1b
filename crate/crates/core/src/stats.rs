//! Machine-independent query counters.

use std::ops::AddAssign;
use std::time::Duration;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Exact network distances computed from a query vertex to an object.
    pub exact_distance_calls: u64,
    /// Exact distances from a query vertex to a leaf landmark.
    pub landmark_distance_calls: u64,
    /// Objects taken out of the index as candidates.
    pub candidates_retrieved: u64,
    /// Index nodes expanded.
    pub nodes_visited: u64,
    /// Priority queue or stack pushes and pops.
    pub queue_operations: u64,
    /// Vertices settled by the distance backend.
    pub vertices_settled: u64,
    pub wall_time: Duration,
}

impl AddAssign<&QueryStats> for QueryStats {
    fn add_assign(&mut self, rhs: &QueryStats) {
        self.exact_distance_calls += rhs.exact_distance_calls;
        self.landmark_distance_calls += rhs.landmark_distance_calls;
        self.candidates_retrieved += rhs.candidates_retrieved;
        self.nodes_visited += rhs.nodes_visited;
        self.queue_operations += rhs.queue_operations;
        self.vertices_settled += rhs.vertices_settled;
        self.wall_time += rhs.wall_time;
    }
}
