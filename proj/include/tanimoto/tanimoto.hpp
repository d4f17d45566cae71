#pragma once

#include "tanimoto/composed.hpp"
#include "tanimoto/feature_map.hpp"
#include "tanimoto/feature_vector.hpp"
#include "tanimoto/gram.hpp"
#include "tanimoto/io.hpp"
#include "tanimoto/kernel_spec.hpp"
#include "tanimoto/kernels.hpp"
#include "tanimoto/krr.hpp"
#include "tanimoto/piecewise.hpp"
#include "tanimoto/smooth.hpp"
