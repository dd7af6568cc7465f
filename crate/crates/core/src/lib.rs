pub mod ring;
pub mod linalg;
pub mod exterior;
pub mod forms;
pub mod liealg;
pub mod engine;
pub mod level;

pub use ring::{PrincipalIdeal, RingContext, RingElement};
pub use linalg::{Matrix, Transvection};
pub use exterior::{compound, IndexSet, Shuffle};
pub use forms::MultilinearForm;
pub use engine::StabilizerChain;
pub use level::Net;
