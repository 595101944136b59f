//! Real traces of puzzle pieces, the Cantor set data of the third iterate,
//! critical itineraries and the itinerary-driven parameter search.

mod cantor;
mod itinerary;
mod search;
mod trace;

pub use cantor::{cantor_data, cantor_traces, inverse_branch, CantorData, Identification};
pub use itinerary::{
    critical_itinerary, critical_itinerary_with_tolerance, critical_orbit, kn_membership, ItineraryPrefix,
    KnReport, MEMBERSHIP_TOLERANCE,
};
pub use search::{find_parameter, parameter_bracket, ParameterBracket, SCAN_POINTS};
pub use trace::{central_trace, RealTrace};
