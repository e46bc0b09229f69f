#pragma once

#define FMDS_VERSION "0.1.0"
