#ifndef WINFIT_WINFIT_HPP
#define WINFIT_WINFIT_HPP

#include "winfit/distribution.hpp"
#include "winfit/engine.hpp"
#include "winfit/session.hpp"
#include "winfit/synth.hpp"
#include "winfit/trace.hpp"
#include "winfit/trace_io.hpp"

#endif  // WINFIT_WINFIT_HPP
