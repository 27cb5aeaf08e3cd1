#ifndef QEILAB_VERSION_HPP
#define QEILAB_VERSION_HPP

#define QEILAB_VERSION "0.1.0"

#endif
