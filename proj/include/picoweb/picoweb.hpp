#pragma once

#include "picoweb/app.hpp"
#include "picoweb/errors.hpp"
#include "picoweb/http.hpp"
#include "picoweb/pipeline.hpp"
#include "picoweb/router.hpp"
#include "picoweb/staticfs.hpp"
#include "picoweb/wire.hpp"
