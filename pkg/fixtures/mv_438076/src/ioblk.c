/* ioblk.c - block-at-a-time descriptor transfer. */

#include <unistd.h>

#include "fsops.h"

#define BLK 8192

static char blk[BLK];

/* Move LEN bytes between two descriptors. */
int
block_transfer (int in_fd, int out_fd, size_t len)
{
  while (len > 0)
    {
      ssize_t n = read (in_fd, blk, len < BLK ? len : BLK);
      if (n <= 0)
        return -1;
      if (write (out_fd, blk, (size_t) n) != n)
        return -1;
      len -= (size_t) n;
    }
  return 0;
}

/* Discard LEN bytes from a descriptor. */
int
block_skip (int in_fd, size_t len)
{
  while (len > 0)
    {
      ssize_t n = read (in_fd, blk, len < BLK ? len : BLK);
      if (n <= 0)
        return -1;
      len -= (size_t) n;
    }
  return 0;
}
