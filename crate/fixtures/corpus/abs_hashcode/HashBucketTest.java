package demo;

import org.junit.Test;
import static org.junit.Assert.assertTrue;

public class HashBucketTest {
    @Test
    public void testShowBugWithPolygenelubricants() {
        HashBucket b = new HashBucket(10);
        int index = b.showBug("polygenelubricants");
        assertTrue("index must be non-negative but was " + index, index >= 0);
    }

    @Test
    public void ordinaryInput() {
        assertTrue(new HashBucket(10).showBug("abc") >= 0);
    }
}
