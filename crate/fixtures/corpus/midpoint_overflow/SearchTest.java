package demo;

import org.junit.Test;
import static org.junit.Assert.assertTrue;

public class SearchTest {
    @Test
    public void largeBounds() {
        int mid = new Search().showBug(2000000000, 2100000000);
        assertTrue("midpoint " + mid, mid >= 2000000000);
    }

    @Test
    public void findsKey() {
        assertTrue(new Search().find(new int[] {1, 3, 5, 7}, 5) == 2);
    }
}
