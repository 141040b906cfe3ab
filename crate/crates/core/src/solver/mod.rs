pub mod best_response;
pub mod bracket;
pub mod double_limit;
pub mod lp;
pub mod restricted;
pub mod sim;
