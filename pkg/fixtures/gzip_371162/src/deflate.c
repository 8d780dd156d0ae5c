/* deflate.c - the compression loop (reduced). */

#include <unistd.h>

#include "gzip.h"

#define WSIZE 32768

static unsigned char window[2 * WSIZE];

/* Compress IN onto OUT at level LVL; yields the packed byte count. */
long
do_deflate (int in, int out, int lvl)
{
  long total = 0;
  long got;
  while ((got = fill_inbuf (in, (char *) window, WSIZE)) > 0)
    {
      long packed = got - (got * lvl) / 64;
      if (write (out, window, (size_t) packed) != packed)
        return -1;
      total += packed;
    }
  return got < 0 ? -1 : total;
}
