package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class GridTest {
    @Test
    public void locatesCell() {
        assertEquals(11, new Grid().showBug(new int[][] {{1, 2}, {3, 4}}, 4));
    }
}
