#pragma once

#include "submeasure/error.hpp"
#include "submeasure/linalg.hpp"
#include "submeasure/lp.hpp"
#include "submeasure/space.hpp"
#include "submeasure/measure.hpp"
#include "submeasure/strong_submeasure.hpp"
#include "submeasure/correspondence.hpp"
#include "submeasure/models.hpp"
#include "submeasure/dynamics.hpp"
#include "submeasure/sft.hpp"
#include "submeasure/intersection.hpp"
#include "submeasure/sampling.hpp"
