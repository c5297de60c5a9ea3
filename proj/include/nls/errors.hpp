#ifndef NLS_ERRORS_HPP
#define NLS_ERRORS_HPP

#include <stdexcept>

namespace nls {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MeshConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FactorizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BreakdownError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nls

#endif
