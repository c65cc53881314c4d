#pragma once

#include <stdexcept>
#include <string>

namespace exsearch {

// Base type for every failure the library reports. Callers that want a
// single catch-all can catch this; everything else derives from it.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// parse_trace: input contained neither exception headers nor frames.
struct no_trace_found : error {
    using error::error;
};

// degree_of_interest: position outside [1, frame_count].
struct position_out_of_range : error {
    using error::error;
};

// extract_content: no textual content could be recovered.
struct malformed_document : error {
    using error::error;
};

// search: provider name not present in the registry.
struct unknown_provider : error {
    using error::error;
};

// search: provider reachable in principle but failed for this request.
struct provider_unavailable : error {
    using error::error;
};

// build_corpus: zero pages survived merging, fetching and extraction.
struct empty_corpus : error {
    using error::error;
};

// provider_confidence: a non-positive average rank.
struct invalid_rank : error {
    using error::error;
};

// Frontend request or configuration that violates a contract.
struct validation_error : error {
    using error::error;
};

}  // namespace exsearch
