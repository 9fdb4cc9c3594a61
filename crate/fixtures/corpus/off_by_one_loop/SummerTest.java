package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class SummerTest {
    @Test
    public void sumsAll() {
        assertEquals(6, new Summer().showBug(new int[] {1, 2, 3}));
    }
}
