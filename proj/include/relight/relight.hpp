// The relight source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <relight/compose/compose.hpp>
#include <relight/core/error.hpp>
#include <relight/core/image.hpp>
#include <relight/core/parallel.hpp>
#include <relight/core/rng.hpp>
#include <relight/core/vec.hpp>
#include <relight/envlight/envmap.hpp>
#include <relight/envlight/procedural.hpp>
#include <relight/envlight/sampler.hpp>
#include <relight/envlight/sh.hpp>
#include <relight/io/image_io.hpp>
#include <relight/mesh/mesh.hpp>
#include <relight/mesh/obj.hpp>
#include <relight/mesh/primitives.hpp>
#include <relight/mesh/smooth.hpp>
#include <relight/metrics/metrics.hpp>
#include <relight/pipeline/config.hpp>
#include <relight/pipeline/dataset.hpp>
#include <relight/pipeline/pose.hpp>
#include <relight/pipeline/relight.hpp>
#include <relight/tracer/bvh.hpp>
#include <relight/tracer/camera.hpp>
#include <relight/tracer/gbuffer.hpp>
#include <relight/tracer/render.hpp>
