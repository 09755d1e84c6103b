#pragma once

#include "mors/errors.hpp"
#include "mors/evaluate.hpp"
#include "mors/faultmap_io.hpp"
#include "mors/fixture.hpp"
#include "mors/format.hpp"
#include "mors/generator.hpp"
#include "mors/geometry.hpp"
#include "mors/histogram.hpp"
#include "mors/network.hpp"
#include "mors/network_io.hpp"
#include "mors/parallel.hpp"
#include "mors/profile.hpp"
#include "mors/profile_io.hpp"
#include "mors/quantize.hpp"
#include "mors/rng.hpp"
#include "mors/sampler.hpp"
#include "mors/tensor.hpp"
#include "mors/weight_image.hpp"
