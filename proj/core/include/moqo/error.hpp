#pragma once

#include <stdexcept>
#include <string>


namespace moqo {

/** Raised when arguments violate a structural precondition: mismatched objective lists, overlapping table sets,
 * dangling plan identifiers.  These indicate a programming error in the caller. */
struct StructuralError : std::logic_error
{
    using std::logic_error::logic_error;
};

/** Raised when user-supplied data (catalog, query spec, configuration) fails validation. */
struct InvalidInput : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

/** Raised when an operation is invoked outside its contract, e.g. RTA with finite bounds. */
struct ContractError : std::logic_error
{
    using std::logic_error::logic_error;
};

}
