#pragma once

#define DIMIMO_VERSION "1.0.0"
