#pragma once

#include "submeasure/sampling.hpp"
#include "submeasure/submeasure.hpp"

namespace testing_support {

using namespace submeasure;

}  // namespace testing_support
