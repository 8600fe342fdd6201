#pragma once

#include "uvtransfer/baseline.hpp"
#include "uvtransfer/cache.hpp"
#include "uvtransfer/correspondence.hpp"
#include "uvtransfer/errors.hpp"
#include "uvtransfer/geometry.hpp"
#include "uvtransfer/mesh.hpp"
#include "uvtransfer/metrics.hpp"
#include "uvtransfer/png_io.hpp"
#include "uvtransfer/sampling_map.hpp"
#include "uvtransfer/texture.hpp"
#include "uvtransfer/transfer.hpp"
