pub mod anchors;
pub mod bandit;
pub mod checkpoint;
pub mod curriculum;
pub mod lemma1;
