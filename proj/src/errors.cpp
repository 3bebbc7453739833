#include "htgd/errors.hpp"

namespace htgd {

void throw_invalid(const std::string& what) { throw InvalidArgument(what); }

}  // namespace htgd
