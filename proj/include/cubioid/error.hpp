#pragma once

#include <stdexcept>
#include <string>

namespace cubioid {

/// Base of every error thrown by the library. `numerical()` separates
/// failures of floating-point procedures from contract violations so the
/// CLI can map them to distinct exit codes.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what, bool numerical = false)
        : std::runtime_error(what), numerical_(numerical) {}
    [[nodiscard]] bool numerical() const noexcept { return numerical_; }

private:
    bool numerical_;
};

struct parse_error : error {
    using error::error;
};
struct not_found : error {
    explicit not_found(const std::string& w) : error("not found: " + w) {}
};
struct wrong_type : error {
    explicit wrong_type(const std::string& w) : error("wrong type: " + w) {}
};
struct not_a_vertex : error {
    explicit not_a_vertex(const std::string& w) : error("not a vertex: " + w) {}
};
struct not_an_orbit : error {
    explicit not_an_orbit(const std::string& w) : error("not an orbit: " + w) {}
};
struct bound_exceeded : error {
    explicit bound_exceeded(const std::string& w) : error("bound exceeded: " + w) {}
};
struct not_escaping : error {
    explicit not_escaping(const std::string& w) : error("not escaping: " + w, true) {}
};
struct numerical_stall : error {
    explicit numerical_stall(const std::string& w) : error("numerical stall: " + w, true) {}
};
struct ill_conditioned : error {
    explicit ill_conditioned(const std::string& w) : error("ill conditioned: " + w, true) {}
};
struct undetermined : error {
    explicit undetermined(const std::string& w) : error("undetermined: " + w, true) {}
};

}  // namespace cubioid
