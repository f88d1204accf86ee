#ifndef RANDFIX_ERRORS_HPP
#define RANDFIX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace randfix {

// Base for everything thrown by this library. Checks that merely *report*
// violations (norm axioms, contraction audits, ...) never throw; exceptions
// are reserved for inputs that make the requested computation meaningless.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An event references an atom outside the space.
struct InvalidEventError : Error {
    explicit InvalidEventError(const std::string& msg) : Error(msg) {}
};

// A family of events fails to partition the atom set.
struct PartitionError : Error {
    explicit PartitionError(const std::string& msg) : Error(msg) {}
};

// A numeric argument lies outside its admissible range.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Mismatched dimensions / atom counts between objects.
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// A point fails to lie in the fibre set it was claimed to belong to.
struct MembershipError : Error {
    MembershipError(const std::string& msg, int atom_) : Error(msg), atom(atom_) {}
    int atom = -1;
};

// An operator mapped a point of its region outside the region.
struct SelfMapError : Error {
    SelfMapError(const std::string& msg, int atom_) : Error(msg), atom(atom_) {}
    int atom = -1;
};

// A documented precondition of an operation does not hold.
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

// Scenario file problems, tagged with what went wrong and where.
struct ScenarioError : Error {
    enum class Kind { parse, schema, invariant };
    ScenarioError(Kind kind_, const std::string& path_, const std::string& msg)
        : Error(path_.empty() ? msg : path_ + ": " + msg), kind(kind_), path(path_) {}
    Kind kind;
    std::string path;  // dotted field path, e.g. "bounds.base"
};

}  // namespace randfix

#endif
